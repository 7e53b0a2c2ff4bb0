// Power-of-two test: n & (n - 1) clears the lowest set bit.
int main() {
  int n;
  int cleared;
  n = __VERIFIER_nondet_int();
  n = n % 256;
  if (n <= 0) {
    n = 1;
  }
  cleared = n & (n - 1);
  assert(cleared >= 0);
  assert(cleared < n);
  if (cleared == 0) {
    assert(n >= 1);
  }
  return 0;
}
