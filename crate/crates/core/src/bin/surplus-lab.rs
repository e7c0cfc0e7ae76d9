fn main() {
    std::process::exit(surplus_lab::cli::run(std::env::args_os()));
}
