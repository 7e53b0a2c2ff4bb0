// Exclusive-or keeps the sign class of its operands: same signs give a
// non-negative result, differing signs a negative one.
int main() {
  int a;
  int b;
  int s;
  int d;
  a = *;
  b = *;
  a = a % 50;
  if (a < 0) {
    a = 0 - a;
  }
  b = b % 50;
  if (b < 0) {
    b = 0 - b;
  }
  s = a ^ b;
  assert(s >= 0);
  d = a ^ (0 - b - 1);
  assert(d < 0);
  return 0;
}
