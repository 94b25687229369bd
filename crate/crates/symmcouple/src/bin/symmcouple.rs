fn main() {
    std::process::exit(symmcouple::cli::run(std::env::args_os()));
}
