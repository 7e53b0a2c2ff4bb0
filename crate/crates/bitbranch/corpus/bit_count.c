// Population count of a bounded input.
int main() {
  int v;
  int count;
  int low;
  v = *;
  v = v % 512;
  if (v < 0) {
    v = v + 512;
  }
  count = 0;
  while (v > 0) {
    low = v & 1;
    count = count + low;
    v = v / 2;
  }
  assert(count >= 0);
  assert(count <= 9);
  return 0;
}
