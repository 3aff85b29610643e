fn main() {
    std::process::exit(voidlens_cli::cli::run(std::env::args_os()));
}
