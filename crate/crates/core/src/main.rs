fn main() {
    std::process::exit(chanfid::cli::run());
}
