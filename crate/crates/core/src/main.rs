fn main() {
    println!("sharp-interface-lab");
}
