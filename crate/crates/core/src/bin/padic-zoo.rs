fn main() {
    std::process::exit(padic_zoo::cli::main_with_env());
}
