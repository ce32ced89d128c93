fn main() {
    std::process::exit(fdiv::cli::main_entry());
}
