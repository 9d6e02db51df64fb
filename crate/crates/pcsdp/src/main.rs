fn main() {
    std::process::exit(pcsdp::cli::run());
}
