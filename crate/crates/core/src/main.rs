fn main() {
    std::process::exit(storsion::cli::main());
}
