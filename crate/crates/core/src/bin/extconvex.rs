fn main() {
    std::process::exit(extconvex::cli::main_entry());
}
