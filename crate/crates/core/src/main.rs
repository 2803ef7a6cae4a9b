fn main() {
    std::process::exit(pseudoskeleton::cli::run(std::env::args_os()));
}
