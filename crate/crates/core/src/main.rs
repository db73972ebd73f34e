fn main() {
    std::process::exit(curvature_flow::cli::run_from_args(std::env::args_os()));
}
