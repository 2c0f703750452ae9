fn main() {
    std::process::exit(cusp_surgery::cli::run(std::env::args_os()));
}
