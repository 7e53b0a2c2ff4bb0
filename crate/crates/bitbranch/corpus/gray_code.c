// Binary-to-Gray conversion: g = n ^ (n >> 1) preserves sign class.
int main() {
  int n;
  int shifted;
  int gray;
  n = *;
  n = n % 128;
  if (n < 0) {
    n = n + 128;
  }
  shifted = n >> 1;
  gray = n ^ shifted;
  assert(gray >= 0);
  assert(gray <= 255);
  return 0;
}
