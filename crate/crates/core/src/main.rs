fn main() {
    std::process::exit(bvstar::cli::run(std::env::args_os()));
}
