package httpkit;

public class Client {
    public String describe() {
        return "Client";
    }
}
