fn main() {
    std::process::exit(tensegrity_cli::run(std::env::args_os()));
}
