fn main() {
    std::process::exit(minecraft_kernel::cli::main_with_args(std::env::args_os()));
}
