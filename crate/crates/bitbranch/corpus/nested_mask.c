// Nested bitwise expression that the normalizer splits into temporaries.
int main() {
  int a;
  int b;
  int c;
  int out;
  a = *;
  b = *;
  c = 15;
  a = a % 128;
  if (a < 0) {
    a = a + 128;
  }
  b = b % 128;
  if (b < 0) {
    b = b + 128;
  }
  out = (a & b) | c;
  assert(out >= c);
  return 0;
}
