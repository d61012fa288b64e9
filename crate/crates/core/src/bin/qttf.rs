fn main() {
    std::process::exit(qttf::cli::main());
}
