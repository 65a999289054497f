fn main() {
    std::process::exit(innoviterbi::run());
}
