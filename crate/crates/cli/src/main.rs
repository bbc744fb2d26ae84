fn main() {
    std::process::exit(cascadelab_cli::main_with_args(std::env::args_os()));
}
