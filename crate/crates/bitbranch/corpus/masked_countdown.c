// Countdown whose step is masked with a nondet bound (conjunction of
// non-negative operands in the loop body).
int main() {
  int a;
  int x;
  a = __VERIFIER_nondet_int();
  a = a % 13;
  if (a < 0) {
    a = a + 13;
  }
  a = a + 1;
  x = 200;
  while (x > 0) {
    a--;
    if (a <= 0) {
      a = 7;
    }
    x = x & a;
    x--;
  }
  assert(x <= 0);
  return 0;
}
