fn main() {
    std::process::exit(radineq::cli::run(std::env::args_os()));
}
