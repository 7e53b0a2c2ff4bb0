// Folding nondet words into a bounded checksum with masks and xor.
int main() {
  int sum;
  int word;
  int i;
  sum = 0;
  i = 0;
  while (i < 8) {
    word = __VERIFIER_nondet_int();
    word = word & 4095;
    sum = sum ^ word;
    sum = sum & 4095;
    i = i + 1;
  }
  assert(sum >= 0);
  assert(sum <= 4095);
  return 0;
}
