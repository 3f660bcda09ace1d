fn main() {
    std::process::exit(qspace3::cli::run(std::env::args_os()));
}
