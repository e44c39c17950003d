fn main() {
    std::process::exit(robustchoice::cli::run(std::env::args_os()));
}
