fn main() {
    std::process::exit(spin_thermo::cli::main());
}
