// Accumulating bits until the accumulator saturates at the mask.
int main() {
  int acc;
  int next;
  int rounds;
  acc = 0;
  rounds = 0;
  while (rounds < 10) {
    next = __VERIFIER_nondet_int();
    next = next & 63;
    acc = acc | next;
    rounds++;
  }
  assert(acc >= 0);
  assert(acc <= 63);
  return 0;
}
