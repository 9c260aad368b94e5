fn main() {
    std::process::exit(cren::cli::main_entry());
}
