fn main() {
    std::process::exit(rescoord::cli::run());
}
