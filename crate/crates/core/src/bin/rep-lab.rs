fn main() {
    std::process::exit(rep_lab::cli::run());
}
