// Arithmetic right shift of a non-negative value halves it.
int main() {
  int n;
  int half;
  int sign;
  n = __VERIFIER_nondet_int();
  n = n % 10000;
  if (n < 0) {
    n = 0 - n;
  }
  half = n >> 1;
  assert(half == n / 2);
  sign = n >> 31;
  assert(sign == 0);
  return 0;
}
