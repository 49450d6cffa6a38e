fn main() {
    std::process::exit(eoi_force::cli::main());
}
