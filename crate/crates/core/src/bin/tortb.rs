fn main() {
    std::process::exit(tortb::cli::main_entry());
}
