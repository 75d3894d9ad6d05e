fn main() {
    std::process::exit(skewlink::cli::main_with_args(std::env::args_os()));
}
