// Aligning a value down to a multiple of 8 with a complemented mask.
int main() {
  int n;
  int mask;
  int aligned;
  n = __VERIFIER_nondet_int();
  n = n % 4096;
  if (n < 0) {
    n = n + 4096;
  }
  mask = ~7;
  aligned = n & mask;
  assert(aligned <= n);
  assert(n - aligned < 8);
  return 0;
}
