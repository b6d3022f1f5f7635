fn main() {
    std::process::exit(disocc::cli::main_with_std_streams());
}
