fn main() {
    std::process::exit(cohlab::cli::run(std::env::args_os()));
}
