fn main() {
    std::process::exit(dcmlab_cli::app::main_with(std::env::args_os()));
}
