fn main() {
    println!("breakwater");
}
