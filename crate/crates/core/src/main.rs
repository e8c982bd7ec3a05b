use std::io;

/// Deep recursion over terms is bounded by term depth, which the checks
/// bound, but trees over long lists still need more than the default stack.
const STACK_BYTES: usize = 256 * 1024 * 1024;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let code = std::thread::Builder::new()
        .stack_size(STACK_BYTES)
        .spawn(move || lpcomplete::cli::main_with(args, &mut io::stdout().lock(), &mut io::stderr().lock()))
        .expect("spawn main thread")
        .join()
        .unwrap_or(101);
    std::process::exit(code);
}
