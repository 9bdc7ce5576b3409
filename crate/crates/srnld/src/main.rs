fn main() {
    std::process::exit(srnld::cli::run());
}
