fn main() {
    std::process::exit(flowcob::cli::run(std::env::args_os()));
}
