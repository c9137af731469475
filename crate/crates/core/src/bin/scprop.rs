fn main() {
    std::process::exit(scprop::cli::main_with(std::env::args_os()));
}
