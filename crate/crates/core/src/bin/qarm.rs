fn main() {
    std::process::exit(qarm::cli::run(std::env::args_os()));
}
