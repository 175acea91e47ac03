fn main() {
    let (ev, ld) = coexsim::smoke::check();
    println!("eig={ev:?} logdet={ld}");
}
