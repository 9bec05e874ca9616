fn main() {
    std::process::exit(extlat::cli::run());
}
