fn main() {
    std::process::exit(wavewalk::cli::main_with_args(std::env::args_os()));
}
