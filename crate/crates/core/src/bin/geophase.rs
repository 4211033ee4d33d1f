fn main() {
    std::process::exit(geophase::cli::main_with_args(std::env::args_os()));
}
