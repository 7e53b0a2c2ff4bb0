// Two's-complement negation identity via bitwise complement.
int main() {
  int x;
  int y;
  int z;
  x = __VERIFIER_nondet_int();
  x = x % 1000;
  if (x < 0) {
    x = 0 - x;
  }
  y = ~x;
  assert(y < 0);
  z = ~y;
  assert(z == x);
  return 0;
}
