fn main() {
    std::process::exit(ramanujan_lab::run(std::env::args_os()));
}
