//! Thin binary wrapper around the library CLI.

fn main() {
    std::process::exit(bitbranch::cli::run());
}
