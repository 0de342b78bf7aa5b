fn main() {
    std::process::exit(seclud::cli::run(std::env::args_os()));
}
