fn main() {
    std::process::exit(channel_inclusion::cli::main());
}
