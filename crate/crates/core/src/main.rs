fn main() {
    std::process::exit(spim_isac::cli::dispatch(std::env::args_os()));
}
