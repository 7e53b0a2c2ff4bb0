// Disjunction of non-negative values dominates both operands.
int main() {
  int a;
  int b;
  int c;
  a = *;
  b = *;
  a = a % 100;
  if (a < 0) {
    a = 0 - a;
  }
  b = b % 100;
  if (b < 0) {
    b = 0 - b;
  }
  c = a | b;
  assert(c >= a);
  assert(c >= b);
  return 0;
}
